#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.navigation import NavigateToWaypoint
from robot_smach_states.perception import FindPerson


class FindPersonInArea(smach.StateMachine):
    """Drive to a predefined area and search it for a person."""

    def __init__(self, robot, area="kitchen_waypoint", name=None):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add("SAY_START",
                                   Say(robot, "I am going to look for {}".format(name or "someone")),
                                   transitions={"spoken": "NAVIGATE_TO_WAYPOINT"})

            smach.StateMachine.add("NAVIGATE_TO_WAYPOINT",
                                   NavigateToWaypoint(robot, area),
                                   transitions={"arrived": "FIND_PERSON",
                                                "unreachable": "failed",
                                                "goal_not_defined": "failed"})

            smach.StateMachine.add("FIND_PERSON",
                                   FindPerson(robot, name=name),
                                   transitions={"found": "succeeded",
                                                "not_found": "failed",
                                                "preempted": "failed"})


if __name__ == "__main__":
    rospy.init_node("find_person_in_area")
    FindPersonInArea(get_robot("hero")).execute()
