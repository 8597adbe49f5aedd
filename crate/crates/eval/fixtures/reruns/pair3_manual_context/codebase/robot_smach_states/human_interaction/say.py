import random

import rospy
import smach


class Say(smach.State):
    """Speak a sentence, or a random one from a list, and wait until done."""

    def __init__(self, robot, sentence=None, language=None, block=True):
        smach.State.__init__(self, outcomes=["spoken"])
        self.robot = robot
        self.sentence = sentence
        self.language = language
        self.block = block

    def execute(self, userdata=None):
        sentence = self.sentence
        if isinstance(sentence, list):
            sentence = random.choice(sentence)
        rospy.loginfo("Saying '%s'", sentence)
        self.robot.speech.speak(sentence, self.language, block=self.block)
        return "spoken"


class LearnOperator(smach.State):
    """Look at the operator and store their face under the name 'operator'."""

    def __init__(self, robot, attempts=3):
        smach.State.__init__(self, outcomes=["learned", "skip", "failed"])
        self.robot = robot
        self.attempts = attempts

    def execute(self, userdata=None):
        if self.robot.perception.knows("operator"):
            return "skip"
        for _ in range(self.attempts):
            if self.robot.perception.learn_person("operator"):
                return "learned"
        return "failed"
